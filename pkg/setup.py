"""
Setup script for easy installation and execution.
Handles environment setup, dependency installation, configuration check and a first run.
"""

import shutil
import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 8):
        print("Error: Python 3.8 or higher is required.")
        print(f"Current version: {sys.version}")
        return False
    print(f"Python version: {sys.version.split()[0]}")
    return True


def check_pip():
    """Check if pip is available."""
    try:
        subprocess.run([sys.executable, "-m", "pip", "--version"], check=True, capture_output=True)
        print("pip is available")
        return True
    except subprocess.CalledProcessError:
        print("Error: pip is not available")
        return False


def create_env_file():
    """Create .env file from template if it doesn't exist."""
    env_file = Path(".env")
    env_example = Path(".env.example")

    if not env_file.exists() and env_example.exists():
        shutil.copy(env_example, env_file)
        print("Created .env file from template")
        return True
    elif env_file.exists():
        print(".env file already exists")
        return True
    else:
        print("Error: .env.example file not found")
        return False


def install_dependencies():
    """Install required dependencies."""
    print("Installing dependencies...")
    try:
        subprocess.run([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"], check=True)
        print("Dependencies installed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"Error installing dependencies: {e}")
        return False


def create_directories():
    """Create the output directory named in the environment."""
    try:
        from dotenv import load_dotenv
        import os

        load_dotenv()
        directory = os.getenv("OUTPUT_DIRECTORY", "./runs")
    except ImportError:
        directory = "./runs"
    Path(directory).mkdir(parents=True, exist_ok=True)
    print(f"Created directory: {directory}")


def check_configuration():
    """Parse every bundled configuration template."""
    try:
        from src.templates import ConfigTemplates
        from src.utils.run_config import parse_config

        templates = ConfigTemplates()
        for name in templates.get_available_templates():
            parse_config(templates.get_template(name))
        print(f"Bundled configurations valid: {', '.join(templates.get_available_templates())}")
        return True
    except Exception as e:
        print(f"Error: bundled configuration check failed: {e}")
        return False


def run_application():
    """Run the closed-form steady-state table with the bundled device."""
    print("Running steady-state table...")
    try:
        subprocess.run([sys.executable, "app.py", "steady-state"], check=True)
    except subprocess.CalledProcessError as e:
        print(f"Error running application: {e}")
        return False
    except KeyboardInterrupt:
        print("Run stopped by user")
        return True


def main():
    """Main setup and launch function."""
    print("=" * 60)
    print("NJPO Simulator - Setup & First Run")
    print("=" * 60)

    if not check_python_version():
        sys.exit(1)

    if not check_pip():
        sys.exit(1)

    print("\nSetting up environment...")
    if not create_env_file():
        sys.exit(1)

    if not install_dependencies():
        sys.exit(1)

    create_directories()

    print("Checking configuration...")
    if not check_configuration():
        sys.exit(1)

    print("Setup completed successfully!")
    print("=" * 60)

    choice = input("\nWould you like to compute the steady-state table now? (y/N): ").lower().strip()

    if choice in ["y", "yes"]:
        run_application()
    else:
        print("To run later, use for example:")
        print("   python app.py steady-state")
        print("   python app.py simulate --seed 7")
        print("Setup complete!")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (pip/setuptools): package metadata lives in pyproject.toml
        from setuptools import setup

        setup()
    else:
        main()
