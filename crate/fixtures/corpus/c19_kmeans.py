from sklearn.cluster import KMeans
from sklearn.decomposition import PCA
import numpy as np

X = np.random.rand(200, 5)
reduced = PCA(n_components=2).fit_transform(X)
km = KMeans(n_clusters=3, n_init=10)
km.fit(reduced)
labels = km.predict(reduced)
print(np.bincount(labels))
