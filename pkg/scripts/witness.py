"""Print the counter-intuitive state pairs on the amplitude-damping Phi map.

Both pairs are confirmed with the onset-time oracle: a less entangled state
that disentangles later, and a CD-free state that loses useful entanglement
before a CD-tolerable neighbour does.
"""

import json

from disent.witness import cd_pair, region_pair


def main() -> None:
    for name, pair in (("cd_pair", cd_pair()), ("region_pair", region_pair())):
        out = None if pair is None else [w.to_json() for w in pair]
        print(name, json.dumps(out))


if __name__ == "__main__":
    main()
