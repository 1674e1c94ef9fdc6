"""Replicated details from the trace multiplier of a translate family.

For the family {sinc^2 translated by 0 and by ``--offset``} the trace multiplier
mixes both members, so extrapolating the untranslated member with it produces a
ghost copy at the offset. The single-member multiplier (Sigma = e1 e1*) reproduces
the member exactly. Both spatial reconstructions are written as CSV.

    python demos/translate_artifacts.py --offset 0.75 --out out/demo
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.artifacts import write_series  # noqa: E402
from src.sigma_extrapolation import (  # noqa: E402
    Cube,
    HermitianMatrix,
    SigmaMultiplier,
    SincPower,
    extrapolate_field,
    make_translates,
    reconstruct_space,
    sample_field,
)
from src.sigma_extrapolation.extrapolation import extrapolation_error  # noqa: E402
from src.sigma_extrapolation.set_logging import configure_logging  # noqa: E402

logger = logging.getLogger(__name__)


def parse_arguments():
    parser = argparse.ArgumentParser(
        description="Compare trace and single-member multipliers on a translate family",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--offset", help="Spatial offset of the second member", type=float, default=0.75)
    parser.add_argument("--alpha", help="Dilation factor", type=float, default=2.0)
    parser.add_argument("--out", help="Output directory", type=Path, default=Path("out/demo"))
    parser.add_argument("--verbose", help="Enable verbose logging", action="store_true")
    return parser.parse_args()


def main() -> int:
    args = parse_arguments()
    configure_logging("DEBUG" if args.verbose else None)
    family = make_translates(SincPower((0.0,)), [[args.offset]])
    omega0 = Cube(1, 0.5)
    subject = family.members[0]
    low = sample_field(subject.evaluate, omega0, 1 / 256)
    truth_domain = Cube(1, 0.5 * args.alpha)

    candidates = {
        "trace": HermitianMatrix.identity(family.n),
        "single": HermitianMatrix.outer(np.array([1.0, 0.0])),
    }
    for name, sigma in candidates.items():
        mult = SigmaMultiplier(family, args.alpha, sigma).with_probe_floor(omega0)
        pred = extrapolate_field(mult, low, args.alpha, omega0)
        truth = sample_field(subject.evaluate, truth_domain, 1 / 256, grid=pred)
        logger.info("%s multiplier: relative error %.3e", name, extrapolation_error(pred, truth, truth_domain))
        image = reconstruct_space(pred, (512,), ((-2.0,), (2.0,)))
        write_series(args.out / f"u_{name}.csv", image.axes[0], image.values, axis="x", unit="unit")
    return 0


if __name__ == "__main__":
    sys.exit(main())
