#!/usr/bin/env python3
"""Generate a synthetic diacritized corpus with context-dependent words.

The corpus is written one sentence per line; the plain forms whose marking
depends on the preceding word are listed on stderr so experiments can split
letters into ambiguous and unambiguous classes.
"""

import argparse
import sys

from ccpd.corpus import save_corpus, token_counts
from ccpd.synthetic import make_synthetic_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", help="corpus file to write")
    parser.add_argument("--sentences", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    synth = make_synthetic_corpus(n_sentences=args.sentences, seed=args.seed)
    save_corpus(synth.corpus, args.output)
    counts = token_counts(synth.corpus)
    print(f"{'tokens':>10} {'letters':>10} {'marked':>10}")
    print(f"{counts.tokens:>10} {counts.letters:>10} {counts.marked_letters:>10}")
    print(
        "ambiguous forms: " + " ".join(sorted(synth.ambiguous_forms)),
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
