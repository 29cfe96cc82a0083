import pandas as pd
from sklearn.model_selection import train_test_split
from sklearn import svm
df = pd.read_csv('titanic.csv', low_memory=False)
df = df.where(df != 0, df.median())
train, test = train_test_split(df, test_size=0.2)
cols = ['Pclass', 'Age', 'SibSp', 'Fare']
X_train = train[cols]
y_train = train.Survived
X_test = test[cols]
y_test = test.Survived
model = svm.SVC()
model.fit(X_train, y_train)
model.predict(X_test)
