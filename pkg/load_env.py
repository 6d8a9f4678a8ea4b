import os

from dotenv import load_dotenv

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))


def load_lab_env(env_path: str | None = None) -> bool:
    """Load RANKONE_* overrides from a .env file next to the project root."""
    env_path = env_path or os.path.join(ROOT_DIR, ".env")
    if not os.path.isfile(env_path):
        print("🔧 No .env file found.")
        return False
    print(f"🔧 Loading environment from {env_path}")
    # an exported variable always wins over the file
    return load_dotenv(env_path, override=False)
