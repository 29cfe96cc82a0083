import sys
import pandas as pd

if len(sys.argv) > 1:
    df = pd.read_csv(sys.argv[1])
else:
    df = pd.read_json('default.json')
df.describe()
df.info()
df.head()
