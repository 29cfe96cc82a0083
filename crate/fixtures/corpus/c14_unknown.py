import csv

rows = []
with open('people.csv') as fh:
    reader = csv.reader(fh)
    for row in reader:
        rows.append(row)
for r in rows:
    r.strip()
print(len(rows))
