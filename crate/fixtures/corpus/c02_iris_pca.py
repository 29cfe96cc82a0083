from sklearn.datasets import load_iris
from sklearn.decomposition import PCA
import matplotlib.pyplot as plt

iris = load_iris()
X = iris.data
y = iris.target
pca = PCA(n_components=2)
pca.fit(X)
X_r = pca.transform(X)
plt.scatter(X_r[:, 0], X_r[:, 1], c=y)
plt.title('PCA of IRIS dataset')
plt.show()
