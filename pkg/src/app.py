from orchestrator.verification_api import app, serve

if __name__ == "__main__":
    serve()
