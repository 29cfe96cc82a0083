import functools
import time


def timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.time()
        out = fn(*args, **kwargs)
        print(fn.__name__, time.time() - start)
        return out
    return wrapper


@timed
def work(n):
    return sum(range(n))


work(1000)
