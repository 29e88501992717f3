"""BeWARE simulator: bandit-driven matrix factorization for cold-start recommendation.

Packages:
- core: rating matrices, ground truth, errors and configuration models
- factorization: ALS / ALS-WR with batched Cholesky solves
- policies: greedy, UCB1 and BeWARE.User / BeWARE.Item selectors
- datagen, ingest: synthetic block model and CSV datasets
- sim: the online evaluation protocol and multi-run experiments
"""

__version__ = "0.1.0"
