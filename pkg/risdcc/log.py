import logging

logger = logging.getLogger("risdcc")
