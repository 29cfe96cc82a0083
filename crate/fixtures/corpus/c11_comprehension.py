import os
import re

pattern = re.compile(r'^data_(\d+)\.csv$')
names = [n for n in os.listdir('.') if pattern.match(n)]
sizes = {n: os.path.getsize(n) for n in names}
print(sorted(sizes.items()))
