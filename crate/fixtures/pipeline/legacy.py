import sys
print "usage: legacy.py FILE"
sys.exit(1)
