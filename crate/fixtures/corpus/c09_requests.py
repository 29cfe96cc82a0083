import json
import requests

resp = requests.get('https://example.org/api', timeout=10)
resp.raise_for_status()
payload = resp.json()
with open('payload.json', 'w') as fh:
    json.dump(payload, fh, indent=2)
