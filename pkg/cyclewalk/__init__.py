"""
cyclewalk - Cycle-valued random walks on simplicial complexes

Library and command-line tools for simplicial complexes, chain algebra,
combinatorial Laplacians, the chain-valued Markov chain driven by the
up-Laplacian, torus scaling diagnostics and annealing-based hole localization.

Version: 1.0.0
"""

__version__ = "1.0.0"
__author__ = "Factlabel"
__email__ = "contact@factlabel.com"

# Application metadata
APP_NAME = "cyclewalk"
APP_VERSION = __version__
APP_ORGANIZATION = "Factlabel"
APP_DOMAIN = "factlabel.com"
