int hits;

void *left(void *arg) {
  hits = hits + 1;
  return 0;
}

void *right(void *arg) {
  hits = hits + 2;
  return 0;
}

int main() {
  pthread_t a;
  pthread_t b;
  pthread_create(&a, 0, left, 0);
  pthread_create(&b, 0, right, 0);
  pthread_join(a, 0);
  pthread_join(b, 0);
  return hits;
}
