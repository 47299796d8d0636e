import hashlib
import subprocess
import sys
import os

FIXTURE_PATH = os.path.join(os.path.dirname(__file__), "mbur_qreg", "data", "oecd_bli.csv")
FIXTURE_SHA256 = "301539634f59ed7369ce59bf73de753f7608c689758140cbfe351faa8b39c14e"


def install_requirements():
    """Install required packages"""
    requirements_path = os.path.join(os.path.dirname(__file__), "requirements.txt")

    if os.path.exists(requirements_path):
        try:
            subprocess.check_call([
                sys.executable, "-m", "pip", "install", "-r", requirements_path
            ])
            print("✅ mbur_qreg dependencies installed successfully")
        except subprocess.CalledProcessError as e:
            print(f"❌ Failed to install dependencies: {e}")
            return False
    else:
        print("⚠️ requirements.txt not found")

    return True


def verify_fixture():
    """Check the embedded OECD table against its recorded digest"""
    try:
        with open(FIXTURE_PATH, "rb") as file:
            digest = hashlib.sha256(file.read()).hexdigest()
    except FileNotFoundError:
        print(f"❌ Fixture missing: {FIXTURE_PATH}")
        return False

    if digest != FIXTURE_SHA256:
        print(f"❌ Fixture digest mismatch: {digest}")
        return False
    print("✅ Embedded OECD fixture verified")
    return True


if __name__ == "__main__":
    if install_requirements():
        sys.exit(0 if verify_fixture() else 1)
    sys.exit(1)
