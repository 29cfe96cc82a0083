import pandas as pd

df = pd.read_csv('sales.csv')
df['total'] = df.apply(lambda r: r.price * r.qty, axis=1)
top = df.sort_values('total', ascending=False).head(10)
top.to_csv('top.csv', index=False)
df.head()
