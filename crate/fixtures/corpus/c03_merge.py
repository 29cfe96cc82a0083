import pandas as pd

orders = pd.read_csv('orders.csv')
customers = pd.read_csv('customers.csv')
joined = orders.merge(customers, on='customer_id', how='left')
summary = joined.groupby('country').agg({'total': 'sum'})
summary.to_csv('by_country.csv')
orders.head()
