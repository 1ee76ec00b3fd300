# establishment function types
OFFICE = "office"
RETAIL = "retail"
LOGISTICS_FACILITY = "logistics_facility"
FACTORY = "factory"
FUNCTION_TYPES = (OFFICE, RETAIL, LOGISTICS_FACILITY, FACTORY)

# group label "<commodity>.<industry or function>", epg label
# "<commodity>.<receiver function>.<supplier function>"
GROUP_SEPARATOR = "."

# parameter block layouts
GENERATION_PROD_TERMS = ("const", "floor", "emp", "floor_emp")
GENERATION_CONS_TERMS = ("const", "floor", "emp", "floor_emp", "prod")
SUPPLIER_TERMS = ("time", "prod", "demand", "const", "sigma_or", "sigma_lf", "sigma_dws")
SUPPLIER_SIGMA_OFFSET = 4
SHIPMENT_SIZE_TERMS = ("const", "size", "dist", "dense")

# supplier selection
INTRA_ZONAL_TIME_FLOOR = 60.0
CANDIDATE_SUPPLIER_CAP = 200
DEFAULT_DRAWS = 100
CHOICE_SET_SIZE = 50
MIN_SUPPLIER_OBSERVATIONS = 30
MIN_SHIPMENT_SIZE_OBSERVATIONS = 5
ESTIMATION_GTOL = 1e-5
ESTIMATION_MAX_ITER = 500

# shipment size and frequency
DISTANCE_FLOOR_KM = 0.1
DAYS_PER_YEAR = 365.0

# calibration loop
DEFAULT_LAMBDA_GRID = (1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4)
DEFAULT_MAX_ITER = 15
DEFAULT_EPSILON_SHARE = 0.005
RIDGE_RESIDUAL_TOLERANCE = 1e-8

# random substream keys, combined with the master seed and entity ids
STREAM_SUPPLIER_SELECTION = 1
STREAM_DAILY_SHIPMENTS = 2
STREAM_ADJUSTMENT = 3
STREAM_REASSIGNMENT = 4
STREAM_CHOICE_SET = 5
STREAM_ESTIMATION = 6
STREAM_SYNTH = 7
STREAM_COUNT_NOISE = 8
STREAM_PERTURBATION = 9
