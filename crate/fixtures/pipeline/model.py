from sklearn.decomposition import PCA
from sklearn.linear_model import LogisticRegression
pca = PCA(n_components=2)
reduced = pca.fit_transform(X)
LogisticRegression().fit(reduced, y)
