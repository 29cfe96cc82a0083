import argparse
import pandas as pd


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('path')
    args = parser.parse_args()
    df = pd.read_csv(args.path)
    df.head()
    print(df.shape)


if __name__ == '__main__':
    main()
