"""Dual-engine performance lab for dual-hop AF relaying with nonlinear HPAs.

Closed-form outage/BER/ergodic-capacity evaluation and a reproducible
Monte Carlo link simulator for amplify-and-forward relay networks with
opportunistic relay selection on outdated CSI and memoryless high-power
amplifier distortion (soft limiter, Rapp, Saleh) handled through Bussgang
linearization. The two engines are built to agree and to check each other.
"""

__version__ = "0.1.0"
