import argparse
import json
import sys

from .config.config import SUITES
from .service.service import ExperimentService
from .utils.logger import get_logger

logger = get_logger(__name__)


def main():
    """Main entry point for the inelastic Maxwell toolkit."""
    parser = argparse.ArgumentParser(
        description="Simulate inelastic Maxwell models and verify their contraction properties"
    )

    # Define subparsers for different commands
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Simulate command
    simulate_parser = subparsers.add_parser("simulate", help="Run a paired experiment")
    simulate_parser.add_argument("config", type=str, help="Path to the experiment file")

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Run a verification suite")
    verify_parser.add_argument("suite", type=str, choices=SUITES, help="Suite to run")
    verify_parser.add_argument("config", type=str, help="Path to the experiment file")

    # W2 command
    w2_parser = subparsers.add_parser("w2", help="Exact W2 between two snapshots")
    w2_parser.add_argument("snapshot_a", type=str, help="First snapshot")
    w2_parser.add_argument("snapshot_b", type=str, help="Second snapshot")

    # Coefficients command
    coeffs_parser = subparsers.add_parser("coeffs", help="Print model constants")
    coeffs_parser.add_argument("--e", type=float, help="Restitution coefficient")
    coeffs_parser.add_argument("--p", type=float, help="Kac inelasticity exponent")

    subparsers.add_parser("serve", help="Start the JSON API")

    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        return

    service = ExperimentService()

    if args.command == "simulate":
        try:
            result = service.simulate(args.config)
        except Exception as e:
            logger.error(f"Simulation failed: {e}")
            sys.exit(1)
        for key, path in result.outputs.items():
            print(f"{key}: {path}")

    elif args.command == "verify":
        try:
            report = service.verify(args.suite, args.config)
        except Exception as e:
            logger.error(f"Verification failed to run: {e}")
            sys.exit(1)
        for check in report.failures:
            logger.error(
                f"FAILED {check.suite}/{check.name}: measured {check.measured:.6g}, "
                f"bound {check.bound:.6g}, slack {check.slack:.6g}"
            )
        print(report.summary())
        if not report.passed:
            sys.exit(1)

    elif args.command == "w2":
        try:
            distance = service.w2_snapshots(args.snapshot_a, args.snapshot_b)
        except Exception as e:
            logger.error(f"Error computing W2: {e}")
            sys.exit(1)
        print(repr(distance))

    elif args.command == "coeffs":
        if args.e is None and args.p is None:
            logger.error("Either --e or --p must be provided")
            coeffs_parser.print_help()
            sys.exit(1)
        try:
            values = service.coeffs(e=args.e, p=args.p)
        except Exception as e:
            logger.error(f"Error computing coefficients: {e}")
            sys.exit(1)
        print(json.dumps(values, indent=2))

    elif args.command == "serve":
        from .service.api import start_server

        start_server()


if __name__ == "__main__":
    main()
