from pylab import *

x = linspace(0, 1, 10)
plot(x, x ** 2)
show()
