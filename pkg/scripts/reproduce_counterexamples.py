"""Replay the worked counterexamples and dump their certificates.

Runs the scenario registry (or a named subset), prints every expectation
with its measured value, then sweeps the axiom checkers over each
scenario's mechanism and profile and emits any violation certificates as
compact JSON.  Paste a certificate line into certificate_from_dict and
verify_certificate replays it.
"""

import argparse
import json
import sys

from facloc.axioms import (
    SearchBudget,
    certificate_to_dict,
    check_anonymity,
    check_pareto,
    check_strategy_proofness,
    verify_certificate,
)
from facloc.mechanisms import run_mechanism
from facloc.scenarios import get_scenario, list_scenarios, run_scenario


def show_report(name: str, verbose: bool) -> bool:
    report = run_scenario(name)
    print(f"{name}: {'pass' if report.passed else 'FAIL'}")
    for result in report.results:
        if verbose or not result.passed:
            print(f"  {result.name}: expected {result.expected!r} "
                  f"measured {result.measured!r} "
                  f"{'ok' if result.passed else 'MISMATCH'}")
    return report.passed


def show_certificates(name: str, budget: SearchBudget) -> bool:
    scenario = get_scenario(name)
    if scenario.spec.capacities is not None:
        # the axiom checkers take uncapacitated instances only
        return True
    solution = run_mechanism(scenario.mechanism, scenario.profile, scenario.spec)
    found = (
        check_anonymity(scenario.mechanism, scenario.profile, scenario.spec),
        check_pareto(scenario.profile, solution, budget),
        check_strategy_proofness(scenario.mechanism, scenario.profile, scenario.spec, budget),
    )
    ok = True
    for cert in found:
        if cert is None:
            continue
        replayed = verify_certificate(cert)
        ok = ok and replayed
        doc = json.dumps(certificate_to_dict(cert), sort_keys=True, separators=(",", ":"))
        print(f"  {cert.kind.value} {'replays' if replayed else 'DOES NOT REPLAY'} {doc}")
    return ok


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*",
                        help="scenario names (default: the whole registry)")
    parser.add_argument("--grid-resolution", type=float, default=0.5)
    parser.add_argument("--pad", type=float, default=1.0)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="print passing expectations too")
    args = parser.parse_args(argv)
    names = args.names or [name for name, _ in list_scenarios()]
    budget = SearchBudget(grid_resolution=args.grid_resolution, bounding_box_pad=args.pad)
    ok = True
    for name in names:
        ok = show_report(name, args.verbose) and ok
        ok = show_certificates(name, budget) and ok
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
