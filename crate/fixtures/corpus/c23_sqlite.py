import sqlite3
import pandas as pd

conn = sqlite3.connect('shop.db')
df = pd.read_sql_query('SELECT * FROM orders', conn)
df.to_csv('orders.csv')
conn.close()
df.dropna().to_csv('clean.csv')
