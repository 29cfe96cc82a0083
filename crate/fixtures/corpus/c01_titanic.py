import pandas as pd
from sklearn.model_selection import train_test_split
from sklearn import svm

df = pd.read_csv('titanic.csv', low_memory=False)
df = df.where(df != 0, df.median())
train, test = train_test_split(df, test_size=0.2)
cols = ['Pclass', 'Age', 'SibSp', 'Fare']
model = svm.SVC()
model.fit(train[cols], train.Survived)
print(model.score(test[cols], test.Survived))
print(df.dropna().describe())
