import pandas as pd


def clean(path):
    frame = pd.read_csv(path)
    return frame.dropna()


clean('raw.csv').to_csv('clean.csv')
