#!/usr/bin/env python3
"""Generate the bundled synthetic line catalog (data/fixture_lines.par).

The catalog is synthetic. Every band is a compact cluster of lines placed on
the absorption features the toolkit is built around:

    O2  1.27 um   7880 cm^-1
    CO2 1.6 um    6350 and 6250 cm^-1
    CH4 1.65 um   6024 cm^-1
    O2  A band   13120 cm^-1   (Si channel)

Each band has a four-line core centred on the feature, two six-line branches
out to about +/-9 cm^-1, a weak hot band and a weak second isotopologue. No
line lies more than 10 cm^-1 from its band centre, which keeps the baseline
strips used by the retrieval (15-25 cm^-1 from the centre) free of lines.

Core intensities are scaled so that the strongest features reach a two-way
optical depth of roughly 0.15-0.3 in the default scene; real HITRAN
intensities for these bands are several times larger. Widths, shifts and
temperature exponents are representative air-broadening values.

The output is fully deterministic. Re-run after editing the band table:

    python3 tools/make_fixture_catalog.py > data/fixture_lines.par
"""

import math
import sys

# molecule, centre, core intensity, gamma_air, gamma_self, n_air, delta_air, B (cm^-1)
BANDS = [
    (7, 7880.0, 1.5e-27, 0.0450, 0.047, 0.72, -0.0040, 1.44),
    (2, 6350.0, 1.5e-24, 0.0720, 0.090, 0.73, -0.0060, 0.39),
    (2, 6250.0, 9.0e-25, 0.0720, 0.090, 0.73, -0.0060, 0.39),
    (6, 6024.0, 2.5e-22, 0.0620, 0.080, 0.70, -0.0080, 5.24),
    (7, 13120.0, 1.5e-27, 0.0450, 0.047, 0.72, -0.0040, 1.44),
]

CORE_OFFSETS = (-0.45, -0.15, 0.15, 0.45)
BRANCH_LINES = 6
BRANCH_START = 1.2
BRANCH_SPACING = 1.45


def fortran_fixed(value, width, decimals):
    """F-format without the leading zero, as written in HITRAN records."""
    text = f"{value:.{decimals}f}"
    if len(text) > width:
        text = text.replace("0.", ".", 1)
    if len(text) > width:
        raise ValueError(f"{value} does not fit F{width}.{decimals}")
    return text.rjust(width)


def record(mol, iso, nu, s, gamma_air, gamma_self, elower, n_air, delta):
    einstein_a = 1.0e-3
    head = (
        f"{mol:2d}{iso:1d}{nu:12.6f}{s:10.3E}{einstein_a:10.3E}"
        + fortran_fixed(gamma_air, 5, 4)
        + fortran_fixed(gamma_self, 5, 3)
        + f"{elower:10.4f}"
        + fortran_fixed(n_air, 4, 2)
        + fortran_fixed(delta, 8, 6)
    )
    assert len(head) == 67, head
    quanta = "SYNTH".ljust(15) * 4
    tail = "000000" + "     0" * 2 + " " + f"{1.0:7.1f}{1.0:7.1f}"
    line = head + quanta + tail
    assert len(line) == 160, len(line)
    return line


def band_lines(mol, centre, s_core, g_air, g_self, n_air, delta, b_rot):
    lines = []
    for i, off in enumerate(CORE_OFFSETS):
        j = i + 1
        lines.append((mol, 1, centre + off, s_core, g_air, g_self, b_rot * j * (j + 1), n_air, delta))
    for side in (-1.0, 1.0):
        for j in range(1, BRANCH_LINES + 1):
            off = side * (BRANCH_START + BRANCH_SPACING * (j - 1))
            envelope = 0.6 * (j / 3.0) * math.exp(1.0 - j / 3.0)
            jj = 2 * j + (1 if side > 0 else 0)
            el = b_rot * jj * (jj + 1)
            w = g_air - 0.0015 * j
            lines.append((mol, 1, centre + off, s_core * envelope, w, g_self, el, n_air, delta))
            # hot band: same rotational pattern, shifted and weaker
            lines.append((mol, 1, centre + off + 0.6, s_core * envelope * 0.04, w, g_self,
                          el + 660.0, n_air, delta))
            # minor isotopologue
            lines.append((mol, 2, centre + off - 0.35, s_core * envelope * 0.01, w, g_self,
                          el, n_air, delta))
    return lines


def main():
    lines = []
    for band in BANDS:
        lines.extend(band_lines(*band))
    lines.sort(key=lambda l: l[2])
    out = sys.stdout
    for l in lines:
        out.write(record(*l) + "\n")


if __name__ == "__main__":
    main()
