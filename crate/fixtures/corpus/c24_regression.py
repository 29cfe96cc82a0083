import numpy as np
from sklearn.linear_model import Ridge
from sklearn.metrics import mean_squared_error

rng = np.random.RandomState(0)
X = rng.rand(50, 3)
y = X.dot([1.0, 2.0, 3.0]) + rng.randn(50)
ridge = Ridge(alpha=0.5)
ridge.fit(X, y)
pred = ridge.predict(X)
print(mean_squared_error(y, pred))
