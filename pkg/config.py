import os
from dotenv import load_dotenv

load_dotenv(os.path.join(os.path.dirname(__file__), '.env'))

LOG_LEVEL = os.getenv("ITU_LOG_LEVEL", "WARNING").upper()

# compile_strategy limits; larger strategies need an explicit override
MAX_COMPONENTS = int(os.getenv("ITU_MAX_COMPONENTS", "200000"))
MAX_SPAN = int(os.getenv("ITU_MAX_SPAN", "14"))
MAX_TILES = int(os.getenv("ITU_MAX_TILES", "3"))

# bounded searches
BUDGET_CARD = int(os.getenv("ITU_BUDGET_CARD", "3"))
BUDGET_DEPTH = int(os.getenv("ITU_BUDGET_DEPTH", "6"))
TOWER_DEPTH = int(os.getenv("ITU_TOWER_DEPTH", "0"))
UNIVERSE_LIMIT = int(os.getenv("ITU_UNIVERSE_LIMIT", "6000"))
MODEL_RETRIES = int(os.getenv("ITU_MODEL_RETRIES", "8"))
SAT_SOLVER = os.getenv("ITU_SAT_SOLVER", "auto")
SAT_SOLVER_CANDIDATES = ["cadical153", "glucose4", "glucose3", "minisat22"]

SEED = int(os.getenv("ITU_SEED", "0"))

DATA_DIR = os.getenv("ITU_DATA_DIR", os.path.join(os.path.dirname(__file__), "data"))

# reserved names shared by the reductions
BULLET = "bullet"
PAD_TILE = "pad"
FRESH_PREFIX = "_fresh"
