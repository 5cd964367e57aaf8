int x;

void *T1(void *arg) {
  x = 3;
  return 0;
}

int main() {
  pthread_t t;
  x = 1;
  pthread_create(&t, 0, T1, 0);
  pthread_join(t, 0);
  x = 2;
  return x;
}
