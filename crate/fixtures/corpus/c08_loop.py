import matplotlib.pyplot as plt
import numpy as np

fig, ax = plt.subplots()
for k in range(1, 5):
    xs = np.linspace(0, 2 * np.pi, 100)
    ax.plot(xs, np.sin(k * xs), label=str(k))
ax.legend()
fig.savefig('waves.png')
