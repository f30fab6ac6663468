"""Shared Monte Carlo reference helpers for the test suite.

The faithful mechanism lives here in a deliberately separate, minimal
implementation (plain complex-gain draws, explicit selection) so the
package's own engine is checked against an independent transcription.
"""

import numpy as np


def faithful_link_mc(cfg, n, seed=1):
    """Draw (g1_current, g2_current, g1_outdated) of the selected relay.

    Selection ranks min(outdated hop1, outdated hop2); rank k of N in
    ascending order. Returns three (n,) arrays.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    nr = cfg.n_relays

    def cgain():
        return (rng.standard_normal((n, nr)) + 1j * rng.standard_normal((n, nr))) / np.sqrt(2.0)

    h1, w1, h2, w2 = cgain(), cgain(), cgain(), cgain()
    h1o = h1 if cfg.rho1 == 1.0 else np.sqrt(cfg.rho1) * h1 + np.sqrt(1 - cfg.rho1) * w1
    h2o = h2 if cfg.rho2 == 1.0 else np.sqrt(cfg.rho2) * h2 + np.sqrt(1 - cfg.rho2) * w2
    bneck = np.minimum(
        np.abs(h1o) ** 2 * cfg.gamma1_bar, np.abs(h2o) ** 2 * cfg.gamma2_bar
    )
    sel = np.argsort(bneck, axis=1)[:, cfg.rank - 1]
    rows = np.arange(n)
    return (
        (np.abs(h1) ** 2 * cfg.gamma1_bar)[rows, sel],
        (np.abs(h2) ** 2 * cfg.gamma2_bar)[rows, sel],
        (np.abs(h1o) ** 2 * cfg.gamma1_bar)[rows, sel],
    )
