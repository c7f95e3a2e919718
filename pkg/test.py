#!/usr/bin/env python3
"""
Test runner script for local development
"""
import subprocess
import sys
import os

def main():
    """Run the fast suite, then import and smoke checks"""

    # Deterministic, quiet runs
    os.environ["PSI_LOG_LEVEL"] = "ERROR"
    os.environ["PSI_SEED"] = "0"

    commands = [
        # Unit and integration tests, slow sweeps excluded
        ["uv", "run", "pytest", "tests/", "-m", "not slow", "--tb=short"],

        # Package imports
        ["uv", "run", "python", "-c", "from psi_parity.cli import main; print('✅ CLI imports successfully')"],

        # Counterexample demo end to end
        ["uv", "run", "python", "run.py", "demo-counterexample", "--samples", "5"],
    ]

    if "--slow" in sys.argv:
        commands.append(["uv", "run", "pytest", "tests/", "-m", "slow", "--tb=short"])

    print("🧪 Running test suite...")

    for i, cmd in enumerate(commands, 1):
        print(f"\n📋 Step {i}/{len(commands)}: {' '.join(cmd[2:])}")

        try:
            subprocess.run(cmd, check=True, capture_output=False)
        except subprocess.CalledProcessError as e:
            print(f"❌ Test failed with exit code {e.returncode}")
            sys.exit(e.returncode)

    print("\n🎉 All tests passed successfully!")

if __name__ == "__main__":
    main()
