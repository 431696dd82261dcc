import os
from dotenv import load_dotenv

# Load environment variables from a .env file
load_dotenv()

class Settings:
    # Exact search
    EXACT_LIMIT = int(os.getenv("COVERCERT_EXACT_LIMIT", 24))

    # Certificate search
    SUPPORT_CAP = int(os.getenv("COVERCERT_SUPPORT_CAP", 40))

    # Spectral diagnostics (never used for certificate decisions)
    EIGEN_TOLERANCE = float(os.getenv("COVERCERT_EIGEN_TOLERANCE", 1e-10))
    BRACKET_TOLERANCE = float(os.getenv("COVERCERT_BRACKET_TOLERANCE", 1e-9))

    # Group tables above this order get sampled associativity checks
    ASSOCIATIVITY_EXHAUSTIVE_LIMIT = int(os.getenv("COVERCERT_ASSOCIATIVITY_LIMIT", 24))
    ASSOCIATIVITY_SAMPLES = int(os.getenv("COVERCERT_ASSOCIATIVITY_SAMPLES", 2000))

    # Output
    OUTPUT_FORMAT = os.getenv("COVERCERT_OUTPUT_FORMAT", "human")
    LOG_LEVEL = os.getenv("COVERCERT_LOG_LEVEL", "INFO")
    JOBS = int(os.getenv("COVERCERT_JOBS", 1))

settings = Settings()
