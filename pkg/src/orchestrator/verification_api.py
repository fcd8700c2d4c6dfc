import logging
import os
import time

from dotenv import load_dotenv
from flask import Flask, Response, jsonify, request

from monitoring.metrics_collector import METRICS_CONTENT_TYPE, MetricsCollector
from orchestrator.queries import algebra_names, bracket_query, grade_query, roots_query, table_query
from orchestrator.suite_runner import SuiteRunner, UnknownSuite, normalize_suite_id, suite_names
from symbolic.errors import SymbolicError
from utils.config import get_setting, load_config

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

app = Flask(__name__)

config = load_config()
runner = SuiteRunner()
metrics = MetricsCollector()


@app.before_request
def count_request():
    metrics.record_request()


@app.route("/health")
def health():
    return jsonify({'status': 'healthy', 'timestamp': time.time(), 'metrics': metrics.get_health_status()})


@app.route("/suites")
def suites():
    return jsonify({'suites': runner.describe(), 'names': suite_names()})


@app.route("/verify/<path:suite>")
def verify(suite):
    name = normalize_suite_id(suite)
    started = time.time()
    try:
        report = runner.run(name)
    except UnknownSuite as e:
        logger.warning(f"Unknown suite requested: {suite}")
        return jsonify({'error': str(e).strip("'\"")}), 404
    except Exception as e:
        logger.error(f"Suite {name} crashed: {e}")
        return jsonify({'error': str(e)}), 500
    metrics.record_suite(report, time.time() - started)
    fmt = request.args.get('format', 'json')
    if fmt == 'csv':
        return Response(report.render('csv'), mimetype='text/csv')
    return jsonify(report.to_json())


@app.route("/bracket")
def bracket_endpoint():
    algebra = request.args.get('algebra')
    a, b = request.args.get('a'), request.args.get('b')
    if not algebra or not a or not b:
        return jsonify({'error': 'Query parameters algebra, a and b are required'}), 400
    try:
        result = bracket_query(algebra, a, b)
        metrics.record_bracket(algebra)
        return jsonify(result)
    except SymbolicError as e:
        logger.warning(f"Bracket query failed: {e}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Unexpected error computing [{a}, {b}] in {algebra}: {e}")
        return jsonify({'error': str(e)}), 500


@app.route("/table/<algebra>")
def table(algebra):
    window = request.args.get('window')
    try:
        result = table_query(algebra, window)
    except (SymbolicError, ValueError) as e:
        return jsonify({'error': str(e), 'algebras': algebra_names()}), 400
    except Exception as e:
        logger.error(f"Unexpected error building the table of {algebra}: {e}")
        return jsonify({'error': str(e)}), 500
    if request.args.get('format') == 'csv':
        return Response(result.render('csv'), mimetype='text/csv')
    return jsonify({'realization': result.realization, 'closes': result.closes(), 'entries': result.rows()})


@app.route("/grade")
def grade():
    element = request.args.get('element')
    if not element:
        return jsonify({'error': 'Query parameter element is required'}), 400
    try:
        return jsonify(grade_query(element, request.args.get('signature', 'P22')))
    except SymbolicError as e:
        return jsonify({'error': str(e)}), 400


@app.route("/roots")
def roots():
    try:
        return jsonify({'algebra': 'osp(2|4)', 'roots': roots_query()})
    except SymbolicError as e:
        logger.error(f"Root data failed: {e}")
        return jsonify({'error': str(e)}), 500


@app.route("/metrics")
def prometheus_metrics():
    return Response(metrics.exposition(), mimetype=METRICS_CONTENT_TYPE)


def serve():
    host = get_setting(config, 'service.host', '0.0.0.0')
    port = int(get_setting(config, 'service.port', 5000))
    logger.info(f"Starting verification API on {host}:{port}")
    app.run(host=host, port=port)


if __name__ == "__main__":
    try:
        serve()
    except Exception as e:
        logger.critical(f"Failed to start application: {e}")
