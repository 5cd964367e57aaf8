int value;

void *worker(void *arg) {
  int value = 5;
  value = value * 2;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, worker, 0);
  value = 1;
  pthread_join(t, 0);
  return value;
}
