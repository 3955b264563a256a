"""
Main entry point for the twist quantizer
"""

import sys
import subprocess
from importlib.util import find_spec

# Import name -> requirements.txt entry
REQUIRED = {
    "sympy": "sympy",
    "pydantic": "pydantic",
    "dotenv": "python-dotenv",
    "colorama": "colorama",
    "fastapi": "fastapi",
}


def missing_packages():
    return [package for module, package in REQUIRED.items() if find_spec(module) is None]


def install_requirements(packages):
    """Install the missing packages from requirements.txt"""
    print(f"Missing packages: {', '.join(packages)}")
    print("Installing from requirements.txt...")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
        print("✓ Requirements installed")
    except subprocess.CalledProcessError:
        print("✗ Failed to install requirements")
        sys.exit(2)


def main():
    missing = missing_packages()
    if missing:
        install_requirements(missing)

    from run_quantizer import main as run_main
    sys.exit(run_main())


if __name__ == '__main__':
    main()
