import numpy as np

data = np.loadtxt('values.txt')
mu = np.mean(data)
sigma = np.std(data)
z = (data - mu) / sigma
np.savetxt('z.txt', z)
print('mean', mu, 'std', sigma)
