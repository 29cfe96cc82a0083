import numpy as np
values = np.random.rand(100)
print(np.mean(values), np.std(values))
