#!/usr/bin/env python3
"""
Test runner for the cliffvar test suite.
"""
import argparse
import subprocess
import sys

# pytest selection per test type: (marker expression, test files)
TEST_GROUPS = {
    "fast": ("not slow", []),
    "acceptance": ("slow", ["tests/test_acceptance.py"]),
    "channels": ("not slow", ["tests/test_distributions.py", "tests/test_decomposition.py"]),
    "engines": ("not slow", ["tests/test_circuits.py", "tests/test_stabilizer.py", "tests/test_dense_oracle.py"]),
    "estimator": ("not slow", ["tests/test_estimator.py"]),
    "experiments": ("not slow", ["tests/test_experiments.py", "tests/test_cli.py"]),
    "all": (None, []),
}


def build_command(test_type, verbose=False, coverage=False, workers=None, keyword=None):
    """Assemble the pytest invocation for one test group."""
    markers, files = TEST_GROUPS[test_type]
    cmd = [sys.executable, "-m", "pytest"]
    cmd.extend(files or ["tests/"])
    cmd.append("-v" if verbose else "-q")
    if markers:
        cmd.extend(["-m", markers])
    if keyword:
        cmd.extend(["-k", keyword])
    if coverage:
        cmd.extend(["--cov=cliffvar", "--cov-report=html", "--cov-report=term-missing"])
    # pytest-xdist
    if workers:
        cmd.extend(["-n", str(workers)])
    return cmd


def run_tests(test_type="fast", verbose=False, coverage=False, workers=None, keyword=None):
    """Run one test group; returns True when pytest exits cleanly."""
    cmd = build_command(test_type, verbose, coverage, workers, keyword)
    print(f"[{test_type}] {' '.join(cmd)}")

    try:
        subprocess.run(cmd, check=True)
    except subprocess.CalledProcessError as e:
        print(f"\n{test_type} tests failed (pytest exit code {e.returncode})")
        return False
    except FileNotFoundError:
        print("Python interpreter not found; install the test requirements: pip install -r requirements-test.txt")
        return False
    print(f"\n{test_type} tests passed")
    return True


def main():
    parser = argparse.ArgumentParser(description="Run the cliffvar test suite")
    parser.add_argument(
        "--type",
        choices=sorted(TEST_GROUPS),
        default="fast",
        help="Test group; 'fast' skips the slow acceptance reproductions",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose pytest output")
    parser.add_argument("--coverage", "-c", action="store_true", help="Coverage report for the cliffvar package")
    parser.add_argument("--workers", "-n", type=int, default=None, help="pytest-xdist worker processes")
    parser.add_argument("--keyword", "-k", default=None, help="Only run tests matching this pytest -k expression")
    args = parser.parse_args()

    ok = run_tests(
        test_type=args.type,
        verbose=args.verbose,
        coverage=args.coverage,
        workers=args.workers,
        keyword=args.keyword,
    )
    if not ok:
        sys.exit(1)
    if args.coverage:
        print("Coverage report written to htmlcov/index.html")


if __name__ == "__main__":
    main()
