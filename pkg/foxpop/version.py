version = (1, 0, "DEV2")
