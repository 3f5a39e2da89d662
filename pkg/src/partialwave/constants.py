"""Physical constants used across the toolkit.

Everything internal is Hartree atomic units (hbar = m_e = e = 1).
Only presentation-layer conversions live here.
"""

# 1 atomic unit of time, expressed in attoseconds.
AU_TIME_ATTOSEC = 24.18884

# Fine-structure constant (dimensionless).
FINE_STRUCTURE = 1.0 / 137.035999


def au_to_attosec(t_au: float) -> float:
    return t_au * AU_TIME_ATTOSEC
