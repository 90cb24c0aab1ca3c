"""End-to-end demo: generate a problem file, run the CLI pipeline on it,
and evaluate the synthesized colligation at held-out points."""
import argparse
import json
import pathlib
import tempfile

import numpy as np

from aglerlab.cli import main as cli_main
from aglerlab.preorder import classical
from aglerlab.sampling import random_points, random_transfer_sample
from aglerlab.serialize import dumps, points_to_json, preordering_to_json


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--outdir", default=None,
                        help="directory for the JSON artifacts (default: temp)")
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir or tempfile.mkdtemp(prefix="agler-demo-"))
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    phi, _ = random_transfer_sample(rng, 4, 2)
    problem = {
        "points": points_to_json(phi.sample),
        "phi": [[[[v.real, v.imag] for v in row] for row in mat]
                for mat in phi.values],
        "preordering": preordering_to_json(classical(2)),
        "c": 1.0,
    }
    problem_path = outdir / "problem.json"
    problem_path.write_text(dumps(problem) + "\n")
    print(f"wrote {problem_path}")

    realized_path = outdir / "realized.json"
    code = cli_main(["realize", "--input", str(problem_path),
                     "--output", str(realized_path), "--quiet"])
    doc = json.loads(realized_path.read_text())
    print(f"realize: exit {code}, status {doc['status']}, "
          f"round-trip error {doc['roundtrip_max_error']:.2e}")

    held_out = random_points(rng, 3, 2)
    eval_in = outdir / "eval-in.json"
    eval_in.write_text(dumps({
        "colligation": doc["colligation"],
        "points": points_to_json(held_out),
    }) + "\n")
    eval_out = outdir / "eval-out.json"
    code = cli_main(["eval", "--input", str(eval_in),
                     "--output", str(eval_out), "--quiet"])
    evals = json.loads(eval_out.read_text())
    print(f"eval: exit {code}, held-out norms "
          + ", ".join(f"{n:.4f}" for n in evals["norms"]))
    print(f"artifacts left in {outdir}")


if __name__ == "__main__":
    main()
