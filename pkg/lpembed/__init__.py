"""
lpembed - embeddings (1+ε) de subespaços de ℓ_p em ℓ_p^n para p par
"""

__version__ = "0.1.0"
