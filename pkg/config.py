### INSTANCE FILES ###
SCHEMA_VERSION = 1

######## NUMERIC CONFIG ########
## EPSILON is only used when a value is a float; int and Fraction values compare exactly
EPSILON = 1e-9

######## ORACLE CHECKS ########
## verify_properties is exhaustive up to this ground size, sampled beyond it
PROPERTY_EXHAUSTIVE_LIMIT = 20
## the all-pairs (A, B) submodularity check is only allowed up to this size
PROPERTY_FULL_PAIR_LIMIT = 12
PROPERTY_SAMPLE_COUNT = 20000

## Gomory-Hu construction re-checks symmetry up to this size, trusts the declared flag beyond it
SYMMETRY_CHECK_LIMIT = 12
## min s-t cuts of non-graph oracles are found by enumeration up to this size
MIN_CUT_ENUMERATION_LIMIT = 20

######## MATROID CONFIG ########
MATROID_AXIOM_LIMIT = 10
EXPLICIT_BASES_VALIDATION_LIMIT = 10
## weighted intersection is compared against enumeration up to this size when checking is on
WEIGHTED_INTERSECTION_CHECK_LIMIT = 12

######## ALGORITHMS ########
## brute_force_opt enumerates set partitions, keep it at desk scale
BRUTE_FORCE_LIMIT = 12

######## HARNESS ########
DEFAULT_SEED = 0
DEFAULT_WORKERS = 1
CSV_COLUMNS = ["instance_id", "algorithm", "value", "opt", "ratio", "bound", "verified", "runtime_ms"]

## API_HOST / API_PORT are used when api.py is started directly
API_HOST = "0.0.0.0"
API_PORT = 8119
