import pandas as pd
import numpy as np


def load(path):
    frame = pd.read_csv(path)
    return frame.dropna()


def normalize(frame):
    return (frame - frame.mean()) / frame.std()


data = normalize(load('measurements.csv'))
np.save('normalized.npy', data.values)
