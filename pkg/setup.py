#!/usr/bin/env python3
"""
Setup script for cyclewalk

Installs the dependencies, checks that an LP solver is reachable through
PuLP (the flat norm needs one) and that the package imports.
"""

import os
import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 9):
        print("Error: Python 3.9 or higher is required")
        return False
    return True


def install_dependencies():
    """Install required dependencies"""
    print("Installing dependencies...")

    try:
        subprocess.check_call([
            sys.executable, "-m", "pip", "install", "-r", "requirements.txt"
        ])
        print("✓ Dependencies installed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"✗ Failed to install dependencies: {e}")
        return False


def check_lp_solver():
    """Solve a one-variable LP the way the flat norm does"""
    print("Checking LP solver...")

    try:
        import pulp

        prob = pulp.LpProblem("solver_check", pulp.LpMinimize)
        x = pulp.LpVariable("x", lowBound=0)
        prob += x
        prob += x >= 1
        prob.solve(pulp.PULP_CBC_CMD(msg=0))

        if prob.status == pulp.LpStatusOptimal:
            print("✓ CBC solver is working correctly")
            return True
        print("✗ CBC solver test failed")
        return False

    except Exception as e:
        print(f"✗ CBC solver error: {e}")
        print("\nTrying to fix CBC permissions...")
        return fix_cbc_permissions()


def fix_cbc_permissions():
    """Make the CBC binary PuLP resolves executable (some wheels ship it without +x)"""
    try:
        import pulp

        cbc_path = Path(pulp.PULP_CBC_CMD().path)
        if not cbc_path.exists():
            print("✗ CBC binary not found")
            return False
        print(f"Found CBC at: {cbc_path}")
        os.chmod(cbc_path, 0o755)
        print("✓ Fixed CBC permissions")
        return True

    except Exception as e:
        print(f"✗ Failed to fix CBC permissions: {e}")
        return False


def test_import():
    """Import the package and build the smallest torus"""
    print("Testing package import...")

    try:
        from cyclewalk.core.complex import build_torus_triangulation
        from cyclewalk.core.spectral import betti_numbers

        betti = betti_numbers(build_torus_triangulation(4))
        if betti != [1, 2, 1]:
            print(f"✗ Unexpected Betti numbers of the torus: {betti}")
            return False
        print("✓ Package import successful")
        return True
    except ImportError as e:
        print(f"✗ Import failed: {e}")
        return False


def main():
    """Main setup function"""
    print("cyclewalk Setup")
    print("=" * 40)

    if not check_python_version():
        return 1

    if not install_dependencies():
        return 1

    solver_ok = check_lp_solver()

    if not test_import():
        return 1

    print("\n" + "=" * 40)
    print("Setup completed!")
    print("\nTo run the command line tools:")
    print("  python -m cyclewalk --help")
    print("To run the tests:")
    print("  pytest tests")

    if not solver_ok:
        print("\n⚠️  Warning: no working LP solver detected.")
        print("   flat-norm computations (scaling experiment) will fail.")

    return 0


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (egg_info, editable_wheel, ...):
        # metadata lives in pyproject.toml.
        from setuptools import setup
        setup()
    else:
        sys.exit(main())
