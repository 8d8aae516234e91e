# File formats and report schemas
