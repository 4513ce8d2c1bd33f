"""strata-kit: exact tame local-field calculus with a matrix-lattice oracle.

Subpackages:

- ``residue``    — finite-field coefficient arithmetic
- ``tower``      — tame tower fields, elements, embeddings, subfields
- ``minimal``    — minimality / genericity tests and chunk factorization
- ``strata``     — stratum and filtration-index calculus, group presentations
- ``translate``  — bidirectional datum-skeleton translation
- ``oracle``     — brute-force matrix/lattice verification layer
- ``cli``        — JSON command-line front end
"""

__version__ = "0.1.0"
