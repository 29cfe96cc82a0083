import json
import logging

log = logging.getLogger(__name__)
try:
    with open('config.json') as fh:
        cfg = json.load(fh)
except FileNotFoundError:
    log.warning('no config, using defaults')
    cfg = {}
log.info('loaded %d keys', len(cfg))
