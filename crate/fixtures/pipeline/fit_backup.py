from sklearn import svm
clf = svm.SVC(C=2.0)
clf.fit(X, y)
