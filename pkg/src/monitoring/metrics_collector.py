import logging
import os
from datetime import datetime
from typing import Any, Dict, Optional

from prometheus_client import CONTENT_TYPE_LATEST, Counter, Gauge, generate_latest

from utils.reporting import Report

# Configure logging
logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Prometheus metrics - unique names to avoid conflicts
SUITES_RUN = Counter('verification_suites_total', 'Total number of verification suites run', ['suite'])
SUITES_PASSED = Counter('verification_suites_passed_total', 'Suites that passed', ['suite'])
SUITES_FAILED = Counter('verification_suites_failed_total', 'Suites that failed', ['suite'])
BRACKETS_COMPUTED = Counter('verification_brackets_total', 'Ad-hoc brackets computed', ['algebra'])
LAST_SUITE_SECONDS = Gauge('verification_last_suite_seconds', 'Duration of the last suite run')
REQUESTS_COUNT = Counter('verification_requests_total', 'Total number of requests to the verification API')

METRICS_CONTENT_TYPE = CONTENT_TYPE_LATEST


class MetricsCollector:
    """Records verification outcomes into the Prometheus registry and keeps the last result per suite."""

    def __init__(self):
        self.last_results: Dict[str, Dict[str, Any]] = {}
        self.collection_errors = 0
        logger.info("MetricsCollector initialized")

    def record_suite(self, report: Report, seconds: float):
        suite = report.name
        try:
            SUITES_RUN.labels(suite=suite).inc()
            if report.passed:
                SUITES_PASSED.labels(suite=suite).inc()
            else:
                SUITES_FAILED.labels(suite=suite).inc()
            LAST_SUITE_SECONDS.set(seconds)
        except Exception as e:
            self.collection_errors += 1
            logger.warning(f"Failed to update Prometheus metrics: {e}")
        first = report.first_failure()
        self.last_results[suite] = {
            'pass': report.passed,
            'checks': len(report.entries),
            'first_failure': first.identity_id if first else None,
            'seconds': round(seconds, 3),
            'timestamp': datetime.utcnow().isoformat(),
        }

    def record_bracket(self, algebra: str):
        try:
            BRACKETS_COMPUTED.labels(algebra=algebra).inc()
        except Exception as e:
            self.collection_errors += 1
            logger.warning(f"Failed to update Prometheus metrics: {e}")

    def record_request(self):
        REQUESTS_COUNT.inc()

    def exposition(self) -> bytes:
        return generate_latest()

    def get_health_status(self, suite: Optional[str] = None) -> Dict[str, Any]:
        status = {
            'status': 'healthy' if self.collection_errors == 0 else 'degraded',
            'collection_errors': self.collection_errors,
            'suites_recorded': len(self.last_results),
        }
        if suite is not None:
            status['last_result'] = self.last_results.get(suite)
        return status
