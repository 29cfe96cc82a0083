import matplotlib.pyplot as plt
import numpy as np
xs = np.linspace(0, 1, 50)
plt.plot(xs, np.sin(xs))
plt.savefig('out.png')
