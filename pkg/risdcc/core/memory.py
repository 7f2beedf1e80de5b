"""
Process memory reporting for long Monte-Carlo runs
"""

import gc

import psutil

from risdcc.log import logger


def get_memory_info() -> dict[str, float]:
    """Get current memory usage information"""
    process = psutil.Process()
    return {
        'cpu_memory_mb': process.memory_info().rss / 1024 / 1024,
        'cpu_memory_percent': process.memory_percent(),
    }


def cleanup_memory() -> int:
    """Run the garbage collector between SNR points"""
    try:
        collected = gc.collect()
        if collected > 0:
            logger.debug(f"🧹 Memory cleanup (collected {collected} objects)")
        return collected
    except Exception as e:
        logger.warning(f"⚠️ Memory cleanup warning: {e}")
        return 0
