# __init__.py
"""Checks genus representation of binary quadratic forms and counts the
primes that shifted form values produce.

Modules exported by this package:
- `arith_tools`: factoring helpers, the Kronecker symbol, square roots
          modulo 4n, the Chinese remainder step and a segmented prime
          sieve.
- `form_tools`: QuadraticForm objects, reduction (definite and
          indefinite), composition, class groups and genera.
- `table_tools`: the local representation tables, one row per prime
          dividing 2D, and the two ways of deciding genus representation
          (row conditions or residues modulo Q).
- `oracle_tools`: brute-force representation checks and the harness that
          compares them with the tables.
- `admissible_tools`: the search for an admissible pair (d, L) for a
          shifted target set An + B, plus its exceptional families.
- `prime_count_tools`: counts primes p with p = f(x, y) + A (up to the
          shift B), the squarefree and sifted counts, and growth reports.
- `apollonian_tools`: Descartes quadruples, packing walks, the tangency
          form and tangent prime counts.
- `cli`: the `qform-tk` command line.
"""
__version__ = "0.3.0"
