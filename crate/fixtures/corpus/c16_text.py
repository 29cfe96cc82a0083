from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.naive_bayes import MultinomialNB

docs = ['spam spam', 'ham eggs', 'spam eggs']
labels = [1, 0, 1]
vec = TfidfVectorizer()
X = vec.fit_transform(docs)
clf = MultinomialNB()
clf.fit(X, labels)
print(clf.predict(vec.transform(['spam'])))
